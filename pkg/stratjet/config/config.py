import os


class Config:
    # Base configuration
    DEFAULT_CHAR = int(os.environ.get('STRATJET_CHAR', 0))
    MAX_MATRIX_COLUMNS = int(os.environ.get('STRATJET_MAX_COLUMNS', 20000))  # dense-matrix guard

    # Suite runner
    SUITE_WORKERS = int(os.environ.get('STRATJET_SUITE_WORKERS', 1))
    RANDOM_SEED = int(os.environ.get('STRATJET_RANDOM_SEED', 1729))
    REPORT_SCHEMA_VERSION = '1.0'

    # Logging configuration
    LOG_FORMAT = '%(asctime)s %(run_id)s %(levelname)s %(name)s %(message)s'
    LOG_LEVEL = os.environ.get('LOG_LEVEL', 'INFO')
    LOG_FILE = os.environ.get('LOG_FILE')
    LOG_MAX_BYTES = 10485760  # 10MB
    LOG_BACKUP_COUNT = 10
    TESTING = False


class DevelopmentConfig(Config):
    DEBUG = True
    LOG_LEVEL = os.environ.get('LOG_LEVEL', 'DEBUG')


class ProductionConfig(Config):
    DEBUG = False
    LOG_LEVEL = os.environ.get('LOG_LEVEL', 'WARNING')
    LOG_FILE = os.environ.get('LOG_FILE', 'logs/stratjet.log')
    SUITE_WORKERS = int(os.environ.get('STRATJET_SUITE_WORKERS', 4))


class TestingConfig(Config):
    TESTING = True
    LOG_LEVEL = 'WARNING'
    LOG_FILE = None
    MAX_MATRIX_COLUMNS = 5000


config = {
    'development': DevelopmentConfig,
    'production': ProductionConfig,
    'testing': TestingConfig,
    'default': DevelopmentConfig
}
