"""The backend of the rational points toolkit."""
