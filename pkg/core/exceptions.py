from django.core.exceptions import ValidationError


class DatasetParseError(ValidationError):
    """
    Línea FIMI inválida. `line` es 1-based, igual que en el archivo.
    """

    def __init__(self, line: int, token: str):
        self.line = line
        self.token = token
        super().__init__(
            f"Línea {line}: token no entero {token!r}.",
            code="fimi_parse",
            params={"line": line, "token": token},
        )


class TrieMismatchError(LookupError):
    """
    Se intentó sumar soporte a un itemset que no está en el trie:
    el mapper y el trie de candidatos no coinciden.
    """


class ConsistencyError(RuntimeError):
    """
    Los map tasks de un mismo job reportaron contextos distintos
    (candidateCount / npass). Indica un mapper no determinista.
    """
