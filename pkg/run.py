import os
from stratjet import create_app
from dotenv import load_dotenv

# Load environment variables from .env file
load_dotenv()

# Get environment from environment variable or default to development
env = os.environ.get('STRATJET_ENV', 'development')

# Create the command-line application
cli = create_app(env)

if __name__ == '__main__':
    cli(obj={})
