import os

import yaml


def read_yaml_config(config_path):
    """
    Read a YAML configuration file into a plain dictionary.

    Args:
        config_path (str): Path to the YAML file. ``~`` is expanded.

    Returns:
        dict: The parsed configuration (empty when the file is empty).
    """
    path = os.path.expanduser(config_path)
    if not os.path.exists(path):
        raise FileNotFoundError(f"Configuration file not found: {path}")
    with open(path, "r") as config_file:
        conf = yaml.safe_load(config_file)
    return conf or {}


def default_config_path():
    """Path of the configuration shipped with the package."""
    package_dir = os.path.dirname(os.path.dirname(os.path.dirname(os.path.abspath(__file__))))
    return os.path.join(package_dir, "config", "config.yaml")
