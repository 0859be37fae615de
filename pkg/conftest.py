# Collection wiring: with ``--doctest-modules`` (tox.ini) pytest would import
# the Sphinx configuration, the setup script and this file as modules; none
# holds tests.
collect_ignore = ['conftest.py', 'setup.py', 'doc']
