"""
Alternative setup for compatibility
"""
from setuptools import setup, find_packages

setup(
    name            = 'fockherald',
    version         = '0.2.0',
    packages        = find_packages(exclude=['tests', 'examples', 'examples.*']),
    package_data    = {'src.gate': ['data/*.json']},
    python_requires = '>=3.12',
    install_requires= [
        'colorama>=0.4.4',
        'numpy>=1.26',
        'scipy>=1.11',
    ],
    entry_points={
        'console_scripts': [
            'fockherald=src.cli:main',
        ],
    },
)
