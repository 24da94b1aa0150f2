import datetime

project = f'pyLaplace'
thisyear = datetime.datetime.now().year
copyright = '2025-%s, pyLaplace developers' % thisyear
author = 'pyLaplace developers'
release = '1.0.0'

extensions = ["sphinx.ext.autodoc", "sphinx.ext.viewcode", "sphinx.ext.mathjax", 'sphinx_copybutton']

templates_path = ['_templates']
exclude_patterns = ['_build', 'Thumbs.db', '.DS_Store']
html_theme = 'sphinx_rtd_theme'
html_static_path = ['_static']
html_show_sourcelink=False

html_theme_options = {
    "navigation_depth": 3,
    "collapse_navigation": False,
    "titles_only": False,
}
