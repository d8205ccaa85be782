"""File-based stand-ins for the external generator and refiner tools.

Each is a small command-line program following the adapter contract: read
``input``, write ``output``, exit non-zero with a message on stderr on failure.
They replay prepared tables so the pipeline runs end to end offline.
"""
