from bobtaillab.utils import metadata

__version__ = metadata["version"]
