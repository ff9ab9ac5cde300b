import setuptools

long_description = "A toolkit for quadratic stochastic operators on the probability simplex"

with open("requirements.txt") as file:
    REQUIRED_PACKAGES = file.read()

setuptools.setup(
    name="qsolab",
    version="0.1",
    description=long_description,
    long_description=long_description,
    long_description_content_type="text/plain",
    packages=setuptools.find_packages(exclude=("tests", "tools", "config")),
    include_package_data=True,
    python_requires=">=3.8",
    install_requires=REQUIRED_PACKAGES,
    extras_require={"test": ["pytest", "hypothesis"]},
    classifiers=[
        "Programming Language :: Python :: 3",
        "License :: OSI Approved :: Apache Software License",
        "Operating System :: OS Independent",
    ],
    license="Apache 2.0 license",
    entry_points={"console_scripts": ["qsolab=qsolab.command:main", ]})
