"""
One-shot verification from the command line
===========================================

The ``gpy`` command wraps the library.  ``verify-paper`` runs every
headline check and exits nonzero if one fails.  Here it is driven
in-process; the shell equivalent is ``gpy verify-paper``.
"""
from gpysieve import cli

code = cli.main(["verify-paper"])
print("exit code", code)

# %% Other entry points, all accepting --json
cli.main(["tuples", "check", "0,2,4"])
cli.main(["integrals", "i0", "--k", "22", "--poly", "1,60,-300,3500"])
cli.main(["bounds", "thm1", "--theta", "0.75", "--k2", "1"])
