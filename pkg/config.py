# Configuration file for the chartkit toolkit
# Конфигурационный файл для набора инструментов chartkit

import os
from typing import Dict, Any

try:
    from dotenv import load_dotenv
    load_dotenv()
except ImportError:
    pass

PACKAGE_DIR = os.path.dirname(os.path.abspath(__file__))
DATA_DIR = os.path.join(PACKAGE_DIR, 'data')


class CatalogConfig:
    """Locations of the committed data files"""

    CATALOG_DIR = os.environ.get('CHARTKIT_CATALOG', os.path.join(DATA_DIR, 'catalog'))
    SCENARIO_FILE = os.environ.get('CHARTKIT_SCENARIOS', os.path.join(DATA_DIR, 'scenarios.json'))
    SCHEMA_FILE = os.path.join(DATA_DIR, 'move_schemas.json')
    FIXTURE_DIR = os.path.join(DATA_DIR, 'fixtures')
    SCRIPT_DIR = os.path.join(DATA_DIR, 'scripts')


class SearchConfig:
    """Budgets for reduction search and skeleton enumeration"""

    MAX_STATES = int(os.environ.get('CHARTKIT_MAX_STATES', '200000'))
    MAX_DEPTH = int(os.environ.get('CHARTKIT_MAX_DEPTH', '6'))
    WORKERS = int(os.environ.get('CHARTKIT_WORKERS', '4'))
    MAX_WHITE = int(os.environ.get('CHARTKIT_MAX_WHITE', '5'))
    # Upper bound on components that may follow a split region in one move
    MAX_FOLLOWERS = int(os.environ.get('CHARTKIT_MAX_FOLLOWERS', '3'))


class StoreConfig:
    """Canonical-form store settings"""

    STORE_URL = os.environ.get('CHARTKIT_STORE_URL', 'sqlite://')
    ECHO = os.environ.get('CHARTKIT_STORE_ECHO', 'False').lower() == 'true'

    @classmethod
    def get_engine_options(cls, url: str = None) -> Dict[str, Any]:
        """Get engine options for the store URL"""
        url = url or cls.STORE_URL
        if url.startswith('sqlite'):
            options: Dict[str, Any] = {"connect_args": {"check_same_thread": False}}
            if url in ('sqlite://', 'sqlite:///:memory:'):
                # one shared connection keeps the in-memory database alive across threads
                from sqlalchemy.pool import StaticPool
                options["poolclass"] = StaticPool
            return options
        return {
            "pool_recycle": 300,
            "pool_pre_ping": True,
        }


class GeneratorConfig:
    """Random chart generator settings"""

    SEED = int(os.environ.get('CHARTKIT_SEED', '0'))
    WALK_LENGTH = int(os.environ.get('CHARTKIT_WALK_LENGTH', '8'))
    MAX_WHITE = int(os.environ.get('CHARTKIT_GENERATOR_MAX_WHITE', '6'))
    MAX_CROSSINGS = int(os.environ.get('CHARTKIT_GENERATOR_MAX_CROSSINGS', '6'))


class LoggingConfig:
    """Logging settings"""

    LEVEL = os.environ.get('CHARTKIT_LOG_LEVEL', 'INFO').upper()
    FORMAT = '%(asctime)s %(levelname)s %(name)s: %(message)s'


def get_config() -> Dict[str, Any]:
    """Get all configuration settings"""
    return {
        'catalog': {
            'catalog_dir': CatalogConfig.CATALOG_DIR,
            'scenario_file': CatalogConfig.SCENARIO_FILE,
            'schema_file': CatalogConfig.SCHEMA_FILE,
            'fixture_dir': CatalogConfig.FIXTURE_DIR,
            'script_dir': CatalogConfig.SCRIPT_DIR,
        },
        'search': {
            'max_states': SearchConfig.MAX_STATES,
            'max_depth': SearchConfig.MAX_DEPTH,
            'workers': SearchConfig.WORKERS,
            'max_white': SearchConfig.MAX_WHITE,
            'max_followers': SearchConfig.MAX_FOLLOWERS,
        },
        'store': {
            'url': StoreConfig.STORE_URL,
            'echo': StoreConfig.ECHO,
        },
        'generator': {
            'seed': GeneratorConfig.SEED,
            'walk_length': GeneratorConfig.WALK_LENGTH,
            'max_white': GeneratorConfig.MAX_WHITE,
            'max_crossings': GeneratorConfig.MAX_CROSSINGS,
        },
        'logging': {
            'level': LoggingConfig.LEVEL,
        },
    }
