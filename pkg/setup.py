from setuptools import setup, find_packages

with open("requirements.txt") as f:
    install_requires = f.read().strip().split("\n")

# get version from __version__ variable in renewal_opt/__init__.py
from renewal_opt import __version__ as version

setup(
    name="renewal_opt",
    version=version,
    description="Renewal Opt - online drift-plus-penalty control of renewal systems with an offline LFP oracle",
    packages=find_packages(),
    zip_safe=False,
    include_package_data=True,
    install_requires=install_requires,
    entry_points={"console_scripts": ["renewal-opt = renewal_opt.harness.cli:main"]},
)
