# Metadata for package. Used in setup.py and module file(s).

version = "0.1.0"
name = "python_evqkan"
description = "Statevector simulation and variational training of enhanced variational quantum Kolmogorov-Arnold networks."
url = "https://github.com/solo-fsw/python-evqkan"
author = "SOLO FSW"
author_email = "labsupport@FSW.leidenuniv.nl"
