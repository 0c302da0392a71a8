"""Block-recursive Liouvillian eigensystems: core library and command-line front end."""
