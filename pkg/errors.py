# -*- coding: utf-8 -*-
"""Erros de domínio.

Todos herdam de ValueError: quem já trata `except ValueError` (API Flask, CLI)
continua funcionando sem conhecer as subclasses.
"""
from __future__ import annotations


class GspecError(ValueError):
    """Base de todos os erros da biblioteca."""


class DimensionError(GspecError):
    """Forma/tamanho incompatível (matriz não quadrada, n inválido, vetor de tamanho errado)."""


class SymmetryError(GspecError):
    """Matriz deveria ser simétrica (ou antissimétrica) e não é."""


class UnitarityError(GspecError):
    def __init__(self, residual: float, tol: float):
        self.residual = float(residual)
        self.tol = float(tol)
        super().__init__(
            f"matriz não unitária: ‖QᴴQ − I‖_F = {self.residual:.3e} (tolerância {self.tol:.1e})"
        )


class ParameterError(GspecError):
    """Parâmetro fora do domínio (k >= n, grade vazia, sigma negativo...)."""


class ParseError(GspecError):
    def __init__(self, path, line: int | None, msg: str):
        self.path = str(path)
        self.line = line
        where = f"{self.path}:{line}" if line is not None else self.path
        super().__init__(f"{where}: {msg}")
