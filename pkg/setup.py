import setuptools

with open("README.md", "r") as readme:
    long_description = readme.read()

setuptools.setup(
    name="lp-bernstein-lab",
    version="0.1.0",
    description="Numerical lab for L^p Bernstein inequalities on arcs of the unit circle",
    long_description=long_description,
    long_description_content_type="text/markdown",
    packages=setuptools.find_packages(exclude=["tests"]),
    install_requires=[
        "numpy>=1.21",
        "scipy>=1.7",
        "marshmallow-dataclass>=8.4.1",
        "marshmallow-enum>=1.5.1",
        "typeguard>=2.12.0,<3",
    ],
    entry_points={"console_scripts": ["lpbernstein=lpbernstein.cli:main"]},
    classifiers=[
        "Programming Language :: Python :: 3",
        "License :: OSI Approved :: MIT License",
        "Operating System :: OS Independent",
    ],
    python_requires='>=3.8'
)
