from setuptools import setup, find_packages

setup(
    name="gk",
    version="0.1.0",
    packages=find_packages(exclude=["tests", "tests.*", "examples", "examples.*"]),
    include_package_data=True,
    package_data={"gk.scenarios": ["*.gk"]},
    install_requires=[
        # Core dependencies
        "sympy>=1.12",  # Exact domains and DomainMatrix storage
        "pydantic>=2.0.0",  # Scenario and report schemas
        "python-dotenv>=1.0.0",  # Optional .env configuration for the CLI
    ],
    extras_require={
        "test": [
            "pytest>=7.0",
            "hypothesis>=6.0",
        ],
    },
    entry_points={
        'console_scripts': [
            'gk=gk.cli:main',
        ],
    },
    description="Exact (g, K)-module computations over ZZ, QQ, ZZ[1/n] and ZZ[i]",
    long_description=open("README.md").read(),
    long_description_content_type="text/markdown",
    classifiers=[
        "Programming Language :: Python :: 3",
        "License :: OSI Approved :: MIT License",
        "Operating System :: OS Independent",
        "Topic :: Scientific/Engineering :: Mathematics",
    ],
    python_requires=">=3.10",
)
