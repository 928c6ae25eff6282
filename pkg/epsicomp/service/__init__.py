"""
The service layer for epsicomp. Every module here is a set of pure
functions over immutable pydantic models.
"""
