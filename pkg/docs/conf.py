import sys
from datetime import date
from pathlib import Path

import tomlkit

DOCS = Path(__file__).resolve().parent
ROOT = DOCS.parent

project_table = tomlkit.parse(
    (ROOT / "pyproject.toml").read_text(encoding="utf-8")
)["project"]

# hetvar is documented from the source tree, not an installed copy
sys.path.insert(0, str(ROOT))
sys.path.insert(0, str(DOCS))

# sphinx config
language = "en"
project = str(project_table["name"])  # type: ignore
author = str(project_table["maintainers"][0]["name"])  # type: ignore
copyright = f"{date.today().year}, {author}"
release = str(project_table["version"])  # type: ignore
source_suffix = ".rst"
extensions = [
    "sphinx.ext.autodoc",
    "sphinx.ext.autosummary",
    "sphinx.ext.intersphinx",
    "sphinx.ext.mathjax",
    "numpydoc",
    "sphinx_copybutton",
    "sphinxext.opengraph",
]
templates_path = ["_templates"]
exclude_patterns = ["_build"]

# html config
html_theme = "furo"
html_title = f"{project} {release}"

# opengraph config
ogp_description_length = 160
ogp_description = str(project_table["description"])  # type: ignore

# autosummary / autodoc config
autosummary_generate = True
autodoc_default_options = {
    "members": True,
    "member-order": "bysource",
    "exclude-members": "__init__,__new__",
}
autodoc_class_signature = "separated"
autodoc_typehints = "none"

# numpydoc config
numpydoc_show_class_members = False
numpydoc_class_members_toctree = False
numpydoc_xref_param_type = True
numpydoc_xref_aliases = {
    "ndarray": "numpy.ndarray",
    "DataFrame": "pandas.DataFrame",
    "Generator": "numpy.random.Generator",
}
numpydoc_xref_ignore = {"optional", "of", "shape", "default"}

# copy only the code of ">>>" examples
copybutton_prompt_text = ">>> "

intersphinx_mapping = {
    "numpy": ("https://numpy.org/doc/stable/", None),
    "pandas": ("https://pandas.pydata.org/docs/", None),
    "python": ("https://docs.python.org/3", None),
    "scipy": ("https://docs.scipy.org/doc/scipy/", None),
}
