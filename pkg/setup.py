import setuptools

with open("README.md", "r") as fh:
    long_description = fh.read()

setuptools.setup(
    name="lcstat",
    version="0.1.0",
    description=(
        "Static liquid-crystal modeling: hard-rod excluded-volume kernels, Bingham "
        "closure, Frank elastic constants and a one-dimensional smectic-A solver"
    ),
    long_description=long_description,
    long_description_content_type="text/markdown",
    install_requires=[
        "numpy>=1.20",
        "scipy>=1.7",
        "cachetools",
    ],
    python_requires=">=3.8",
    classifiers=[
        "Programming Language :: Python :: 3",
        "License :: OSI Approved :: Apache Software License",
        "Operating System :: OS Independent",
        "Topic :: Scientific/Engineering :: Physics",
    ],
    packages=setuptools.find_packages(),
    entry_points={"console_scripts": ["lcstat=lcstat.cli:main"]},
)
