"""Map files, pair files and input checks."""
