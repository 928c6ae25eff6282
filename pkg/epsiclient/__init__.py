"""
The command-line surface of epsicomp. Defaults can be stored in
~/.epsicomp.conf or ./epsicomp.json, and in EPSICOMP_* environment
variables (EPSICOMP_THREADS caps the worker threads).
"""
