from mallowsld.scripts import cli

cli()
