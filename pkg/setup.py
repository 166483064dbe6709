# ==================================================================================
#       Copyright (c) 2026 The stochosc authors.
#
#   Licensed under the Apache License, Version 2.0 (the "License");
#   you may not use this file except in compliance with the License.
#   You may obtain a copy of the License at
#
#          http://www.apache.org/licenses/LICENSE-2.0
#
#   Unless required by applicable law or agreed to in writing, software
#   distributed under the License is distributed on an "AS IS" BASIS,
#   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
#   See the License for the specific language governing permissions and
#   limitations under the License.
# ==================================================================================
from setuptools import setup, find_packages

setup(
    name="stochosc",
    version="1.0.0",
    packages=find_packages(exclude=["tests.*", "tests"]),
    author="The stochosc authors",
    description="Gaussian wave packet ensembles of a harmonic oscillator with a randomly jumping frequency",
    entry_points={"console_scripts": ["stochosc=stochosc.run:main"]},
    install_requires=["numpy", "scipy", "joblib", "jsonschema", "prometheus-client", "mdclogpy"],
    package_data={"stochosc": ["config_schema.json"]},
)
