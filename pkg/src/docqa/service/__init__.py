from .app import create_app, load_schema, schema_path
from .multipart import FormPart, parse_multipart

__all__ = ["create_app", "load_schema", "schema_path", "FormPart", "parse_multipart"]
