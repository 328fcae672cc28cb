"""HTTP service layer (FastAPI app, schemas, state)."""
