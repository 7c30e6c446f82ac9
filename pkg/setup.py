from setuptools import setup, find_packages


with open('README.md') as f:
    long_description = f.read()

with open('development_requirements.txt') as f:
    dev_requirements = f.read().splitlines()


requirements = [
    requirement.strip() for requirement in open("requirements.txt").readlines()
]

description = ("Verify, classify and search permutation trinomials "
               "over finite fields of characteristic 2 and 3.")

setup(name="ptrinom",
      version="0.1.0",
      description=description,
      long_description=long_description,
      long_description_content_type="text/markdown",
      license="MIT",
      python_requires=">=3.8",
      install_requires=requirements,
      extras_require={
            "development": set(dev_requirements),
            "test": dev_requirements
      },
      entry_points={
            "console_scripts": ["ptrinom = ptrinom.ptrinom_cli.commands:main"]
      },
      packages=find_packages(exclude=["examples", "examples.*"])
      )
