from satsir.cli import cli


cli(prog_name='satsir')
