from setuptools import setup
from os import path

here = path.abspath(path.dirname(__file__))

with open(path.join(here, "README.md"), encoding="utf-8") as f:
    long_description = f.read()

setup(
    name='ebr-python-reasoner',
    version='0.3.0',
    description='Embedding-based instance retrieval over description logic knowledge bases',
    long_description=long_description,
    long_description_content_type="text/markdown",
    license="MIT License",
    classifiers=[
        "Development Status :: 4 - Beta",
        "Intended Audience :: Science/Research",
        "Topic :: Scientific/Engineering :: Artificial Intelligence",
        "License :: OSI Approved :: MIT License",
        "Programming Language :: Python :: 3.9",
        "Programming Language :: Python :: 3.10",
    ],
    keywords="description logic knowledge graph embedding reasoner",
    packages=["ebr_reasoner"],
    package_data={"ebr_reasoner": ["fixtures/*.dl"]},
    python_requires=">=3.8",
    install_requires=[
        "numpy",
        "rdflib",
    ],
    entry_points={
        "console_scripts": ["ebr=ebr_reasoner.cli:main"],
    },
)
