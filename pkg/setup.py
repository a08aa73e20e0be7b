from setuptools import setup, find_packages

with open("README.md", "r", encoding="utf-8") as fh:
    long_description = fh.read()

setup(
    name="RDSim",
    version="1.0",
    description="Synthetic social networks, respondent-driven sampling simulation and RDSII bias diagnostics",
    long_description=long_description,
    long_description_content_type="text/markdown",
    packages=find_packages(exclude=["examples", "examples.*"]),
    classifiers=[
        "Programming Language :: Python :: 3",
        "Programming Language :: Python :: 3.9",
        "Programming Language :: Python :: 3.10",
        "Programming Language :: Python :: 3.11",
        "License :: OSI Approved :: MIT License",
        "Operating System :: OS Independent",
        "Development Status :: 4 - Beta",
        "Intended Audience :: Science/Research",
        "Topic :: Scientific/Engineering :: Mathematics",
    ],
    python_requires=">=3.9",
    install_requires=[
        "numpy>=1.25",        # Generator.spawn for RNG substreams
        "scipy>=1.8",         # Sparse matrices, components, Lanczos
        "pandas>=1.3.0",      # CSV results
        "python-dotenv>=0.19.2",
        "rich",
    ],
    extras_require={
        "test": [
            "pytest>=7",
            "networkx>=2.8",  # Independent oracle for graph measures
        ],
    },
    license="MIT",
    entry_points={
        "console_scripts": [
            "rdsim=rdsim.cli:main",
        ],
    },
)
