from setuptools import find_packages, setup

setup(
    name="banach-constants",
    version="0.1.0",
    description="Numerical estimation of geometric constants of finite-dimensional normed spaces",
    packages=find_packages(exclude=("tests",)),
    python_requires=">=3.9",
    install_requires=[
        "click>=8.1",
        "numpy>=1.24",
        "python-dotenv>=1.0",
        "scipy>=1.10",
    ],
    extras_require={"test": ["pytest>=7.4"]},
    entry_points={"console_scripts": ["banach-constants=banach_constants.cli:entry_point"]},
)
