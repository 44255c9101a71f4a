# Configuration file for the Sphinx documentation builder.
# https://www.sphinx-doc.org/en/master/usage/configuration.html

import pathlib
import sys

import sh
from sphinx.util import logging


logger = logging.getLogger(__name__)

# -- Path setup --------------------------------------------------------------

docs_path = pathlib.Path(__file__).parent.resolve()
src_path = pathlib.Path(docs_path / '..' / 'src').resolve()

sys.path.insert(0, str(src_path))


# -- Project information -----------------------------------------------------

project = 'satsir'
copyright = '2023, satsir developers'
author = 'satsir developers'


# -- General configuration ---------------------------------------------------

extensions = [
    'sphinx.ext.autodoc',
    'sphinx_rtd_theme',
    'reno.sphinxext',
]

templates_path = ['_templates']
exclude_patterns = ['_build', 'Thumbs.db', '.DS_Store']


# -- Options for HTML output -------------------------------------------------

html_theme = 'sphinx_rtd_theme'


# -- Event hooks -------------------------------------------------------------

def hook_init(app):
    logger.info('Building code API ' + str(src_path))
    sh.sphinx_apidoc(
        src_path / 'satsir',
        implicit_namespaces=True,
        doc_project='Code API reference',
        output_dir=docs_path / 'api-code',
        _fg=True,
    )


def setup(app):
    app.connect('builder-inited', hook_init)
