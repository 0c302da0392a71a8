"""CLI: python cli.py {solve,spectrum,evolve,verify} --config run.json ..."""
import sys

from dotenv import load_dotenv

load_dotenv()

from app.main import main

if __name__ == "__main__":
    sys.exit(main())
