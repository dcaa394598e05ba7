import setuptools

with open("README.md", "r", encoding="utf-8") as f:
    long_description = f.read()


__version__ = "0.1.0"

REPO_NAME = "irs-lab"
SRC_REPO = "irs_lab"


setuptools.setup(
    name=SRC_REPO,
    version=__version__,
    description="Numerical lab for invariant random subgroups of lattices in PSL(2,R)",
    long_description=long_description,
    long_description_content_type="text/markdown",
    python_requires=">=3.10",
    package_dir={"": "src"},
    packages=setuptools.find_packages(where="src"),
    install_requires=[
        "numpy",
        "scipy",
        "matplotlib",
        "pydantic>=2",
        "pydantic-settings",
    ],
    entry_points={"console_scripts": [f"{REPO_NAME} = {SRC_REPO}.interfaces.cli.main:main"]},
)
