import json
import hashlib
import dataclasses
from enum import Enum
from fractions import Fraction
from pathlib import Path
from typing import Any

import numpy as np
from pydantic import BaseModel


JsonType = dict[str, Any] | list[Any] | str | int | float | bool | None


def fraction_to_str(value: Fraction) -> str:
    """
    >>> fraction_to_str(Fraction(33, 36))
    '11/12'
    >>> fraction_to_str(Fraction(1))
    '1/1'
    """
    return f'{value.numerator}/{value.denominator}'


def to_jsonable(obj: Any) -> JsonType:  # noqa: PLR0911 - one branch per supported type
    """
    Convert results into plain JSON values.

    Fractions become ``"p/q"`` strings, complex numbers ``[re, im]`` pairs and arrays nested lists.

    >>> to_jsonable({'v': Fraction(3, 4), 'z': 1j, 'a': np.arange(2)})
    {'v': '3/4', 'z': [0.0, 1.0], 'a': [0, 1]}
    """
    if obj is None or isinstance(obj, str | bool | int | float):
        return obj
    if isinstance(obj, Fraction):
        return fraction_to_str(obj)
    if isinstance(obj, complex | np.complexfloating):
        return [float(obj.real), float(obj.imag)]
    if isinstance(obj, np.ndarray):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.generic):
        return obj.item()
    if isinstance(obj, BaseModel):
        return to_jsonable(obj.model_dump(mode='json'))
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        return to_jsonable(dataclasses.asdict(obj))
    if isinstance(obj, Enum):
        return to_jsonable(obj.value)
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, list | tuple):
        return [to_jsonable(v) for v in obj]
    raise TypeError(f'cannot serialise {type(obj).__name__} to JSON')


def canonical_json(data: Any) -> str:
    """Compact JSON with sorted keys; identical data always gives identical text."""
    return json.dumps(to_jsonable(data), sort_keys=True, separators=(',', ':'), allow_nan=False)


def digest(data: Any) -> str:
    return hashlib.sha256(canonical_json(data).encode('utf-8')).hexdigest()


def save_as_json(path: Path, data: Any) -> None:
    """
    Save the given data as JSON to the specified path.
    Short lists (matrix rows) stay on one line so tables remain readable.
    """
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open('wt', encoding='utf-8', newline='\n') as f:
        f.write(pretty_json(to_jsonable(data), indent=2, max_line=100, sort_keys=True, expand_top_level=True))
        f.write('\n')


def pretty_json(  # noqa: PLR0913 - acceptable
    obj: JsonType,
    *,
    indent: int | str = 4,
    max_line: int = 100,
    sort_keys: bool = False,
    expand_top_level: bool = False,
    level: int = 0,
) -> str:
    """
    Hybrid JSON pretty-printer:
    - Normal indentation for readability
    - Collapse short dicts/lists onto one line if under max_line chars
    - Supports sort_keys and indent as int or str
    - Optional top-level control via expand_top_level

    >>> print(pretty_json({'b': [1, 2], 'a': {'x': 1}}, indent=2, sort_keys=True, expand_top_level=True))
    {
      "a": { "x": 1 },
      "b": [ 1, 2 ]
    }
    """
    indent_str = ' ' * indent if isinstance(indent, int) else indent
    sp = indent_str * level

    if isinstance(obj, dict):
        keys = sorted(obj.keys()) if sort_keys else list(obj.keys())
        items = [
            f'{json.dumps(key)}: '
            + pretty_json(obj[key], indent=indent, max_line=max_line, sort_keys=sort_keys, level=level + 1)
            for key in keys
        ]
        if not items:
            return '{}'
        one_line = '{ ' + ', '.join(items) + ' }'
        if not expand_top_level and len(one_line) + len(sp) <= max_line:
            return one_line
        return '{\n' + ',\n'.join(sp + indent_str + item for item in items) + '\n' + sp + '}'

    if isinstance(obj, list):
        items = [
            pretty_json(value, indent=indent, max_line=max_line, sort_keys=sort_keys, level=level + 1)
            for value in obj
        ]
        if not items:
            return '[]'
        one_line = '[ ' + ', '.join(items) + ' ]'
        if not expand_top_level and len(one_line) + len(sp) <= max_line:
            return one_line
        return '[\n' + ',\n'.join(sp + indent_str + item for item in items) + '\n' + sp + ']'

    return json.dumps(obj, allow_nan=False)


__all__ = (
    'JsonType',
    'canonical_json',
    'digest',
    'fraction_to_str',
    'pretty_json',
    'save_as_json',
    'to_jsonable',
)
