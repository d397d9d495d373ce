# -*- coding: utf-8 -*-
#
# cmflow documentation build configuration file.
#
# This file is execfile()d with the current directory set to its containing dir.

import sys, os

# The package is documented from the source tree.
sys.path.insert(0, os.path.abspath(os.path.join('..', '..')))

# -- General configuration -----------------------------------------------------

extensions = ['sphinx.ext.autodoc', 'sphinx.ext.todo', 'sphinx.ext.coverage',
    'sphinx.ext.viewcode', 'sphinx.ext.mathjax']

templates_path = ['_templates']

source_suffix = '.rst'

master_doc = 'index'

project = u'cmflow'
copyright = u'Copyright (c) 2024 by the cmflow developers. All rights reserved.'

# The short X.Y version.
version = '0.1'
# The full version, including alpha/beta/rc tags.
release = '0.1.0'

exclude_patterns = []

pygments_style = 'sphinx'

# -- Options for HTML output ---------------------------------------------------

html_theme = 'default'

html_static_path = ['_static']

htmlhelp_basename = 'cmflowdoc'

# -- Options for LaTeX output --------------------------------------------------

latex_elements = {
}

latex_documents = [
  ('index', 'cmflow.tex', u'cmflow Documentation',
   u'the cmflow developers', 'manual'),
]

# -- Options for manual page output --------------------------------------------

man_pages = [
    ('index', 'cmflow', u'cmflow Documentation',
     [u'the cmflow developers'], 1)
]
