from setuptools import setup, find_packages
from python_evqkan import version_info

setup(
    name=version_info.name,
    description=version_info.description,
    url = version_info.url,
    version=version_info.version,
    author=version_info.author,
    author_email=version_info.author_email,
    packages=["python_evqkan"],
    python_requires=">=3.9",
    install_requires=[
        "numpy",
        "scipy>=1.8",
        "pandas>=1.5",
        "prettytable"
    ],
    entry_points={
        "console_scripts": ["evqkan=python_evqkan.cli:main"]
    }
)
