from setuptools import setup, find_packages

setup(
    name="pants_lab",
    version="0.1",
    packages=find_packages(),
    package_data={"pants_lab": ["data/*.tsv", "data/*.txt"]},
    install_requires=[
        "dagster",
        "dagster-webserver",
        "pandas",
        "duckdb",
        "python-dotenv",
    ],
)
