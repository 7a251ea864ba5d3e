#!/usr/bin/env python
"""
Punto de entrada del proyecto: comandos de minado
(run, verify, report, cost, generate, stats) y el runner de pruebas.
"""
import os
import sys


def main():
    os.environ.setdefault("DJANGO_SETTINGS_MODULE", "config.settings")
    try:
        from django.core.management import execute_from_command_line
    except ImportError as exc:
        raise ImportError(
            "No se pudo importar Django. ¿Está instalado y disponible en "
            "PYTHONPATH? ¿Olvidó activar el entorno virtual?"
        ) from exc
    execute_from_command_line(sys.argv)


if __name__ == "__main__":
    main()
