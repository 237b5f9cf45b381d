import os

from dotenv import load_dotenv


def pytest_configure(config):
    """Load environment variables before tests run"""
    load_dotenv()

    # Keep test output quiet and the defaults predictable
    os.environ.setdefault('SUSY_LOG_LEVEL', 'WARNING')
    os.environ['TESTING'] = 'True'
