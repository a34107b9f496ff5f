#!/usr/bin/env python3
"""
Launcher for the SliceTrace command-line interface.

    python run_app.py list-models
    python run_app.py experiment --model normal_mean_3 --kernels slice,naive-slice --budget 10000 --out nm3.csv
"""

import os
import sys
from dotenv import load_dotenv

# Load environment variables from .env file
load_dotenv()

# Add the project root to the Python path
sys.path.append(os.path.dirname(os.path.abspath(__file__)))


def check_environment():
    """Check that the Iris file the classifier models read is present."""
    from src.config import get_config

    iris_path = get_config()["data"]["iris_path"]
    if not os.path.exists(iris_path):
        print(f"Warning: Iris file not found at {iris_path}")
        print("  The classifier models need it; set IRIS_PATH or pass --iris.")
        return False
    return True


def main():
    """Main function."""
    check_environment()

    from src.cli.main import main as cli_main

    sys.exit(cli_main(sys.argv[1:]))


if __name__ == "__main__":
    main()
