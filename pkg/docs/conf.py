project = "stochosc"
extensions = []
html_theme = "sphinx_rtd_theme"
master_doc = "index"
