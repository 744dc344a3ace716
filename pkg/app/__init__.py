"""SingSi.AI Backend application package."""
