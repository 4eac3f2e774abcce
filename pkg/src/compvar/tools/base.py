"""Base classes for compvar commands."""

from abc import ABC, abstractmethod
from pathlib import Path
from typing import Any

from ..core.exceptions import ValidationError
from ..core.models import BaseResult
from ..utils.formatting import OutputFormat, render
from ..utils.problem_file import ProblemFile, load_problem_file


class BaseTool(ABC):
    """Base class for compvar commands; `execute` returns a report model."""

    def __init__(self, problem: ProblemFile | None = None) -> None:
        self.problem = problem

    @classmethod
    def from_file(cls, path: str | Path) -> "BaseTool":
        return cls(load_problem_file(path))

    def _require_problem(self) -> ProblemFile:
        if self.problem is None:
            raise ValidationError(f"{type(self).__name__} needs a problem file")
        return self.problem

    @abstractmethod
    def execute(self, *args: Any, **kwargs: Any) -> BaseResult:
        """Run the analysis and return its report."""
        pass

    def _format_result(self, result: BaseResult, output_format: OutputFormat = "human") -> str:
        return render(result, output_format)
