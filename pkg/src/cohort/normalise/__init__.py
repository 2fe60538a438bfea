"""N1c geography and school normalisation."""
