"""HTTP front end for the optimization and verification pipeline."""
