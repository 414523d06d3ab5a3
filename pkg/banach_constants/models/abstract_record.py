import json
import math
import collections.abc as collections_abc

import numpy as np


class AbstractRecord(collections_abc.Mapping):

    """
    Represents an immutable record. Values are fixed at construction; use
    replace() to derive a modified copy.
    """

    class Fields:
        pass

    def __init__(self, **data):
        object.__setattr__(self, "_data", {})
        self._set_data(data)
        self._validate()

    def _validate(self):
        """
        Checks the record invariants; subclasses raise SpecValidationError
        """
        pass

    def __getitem__(self, key):
        return self._data[str(key)]

    def __getattr__(self, key):
        if key.startswith("_"):
            raise AttributeError(key)
        try:
            return self._data[key]
        except KeyError:
            raise AttributeError(
                "%s has no field %r" % (self.__class__.__name__, key)
            ) from None

    def __setattr__(self, key, value):
        raise AttributeError("%s is immutable" % self.__class__.__name__)

    def __eq__(self, other):
        return (
            other is not None
            and hasattr(other, "export_all_data")
            and type(self) is type(other)
            and self.export_all_data() == other.export_all_data()
        )

    def __hash__(self):
        return hash((self.__class__.__name__, self.to_json()))

    def __iter__(self):
        return iter(self._data)

    def __len__(self):
        return len(self._data)

    def __contains__(self, key):
        return key in self._data

    def __repr__(self):
        return "<%s> %s" % (
            self.__class__.__name__,
            json.dumps(
                self.export_all_data(),
                sort_keys=True,
                indent=4,
                separators=(",", ": "),
            ),
        )

    def _set_data(self, data):
        """
        sets data from a dict; only keys declared in Fields are accepted
        """
        if not isinstance(data, dict):
            raise ValueError("Bad data to set record data")
        allowed = self.field_names()
        for key, value in data.items():
            if allowed and key not in allowed:
                raise KeyError(
                    "%s has no field %r" % (self.__class__.__name__, key)
                )
            if isinstance(value, np.ndarray):
                value = value.copy()
                value.setflags(write=False)
            self._data[key] = value

    @classmethod
    def field_names(cls):
        return [
            value
            for name, value in vars(cls.Fields).items()
            if not name.startswith("_") and isinstance(value, str)
        ]

    def replace(self, **changes):
        data = dict(self._data)
        data.update(changes)
        return self.__class__(**data)

    def export_value(self, data):
        if isinstance(data, AbstractRecord):
            data = data.export_all_data()
        elif isinstance(data, dict):
            data = dict(
                (k, self.export_value(v)) for k, v in data.items() if v is not None
            )
        elif isinstance(data, (list, tuple)):
            data = [self.export_value(v) for v in data]
        elif isinstance(data, np.ndarray):
            data = [self.export_value(v) for v in data.tolist()]
        elif isinstance(data, (np.floating, np.integer)):
            data = self.export_value(data.item())
        elif isinstance(data, float) and math.isinf(data):
            data = "inf" if data > 0 else "-inf"
        return data

    def export_all_data(self):
        return self.export_value(self._data)

    def to_json(self, **kwargs):
        kwargs.setdefault("sort_keys", True)
        return json.dumps(self.export_all_data(), **kwargs)

    @staticmethod
    def create_object(data, target_class):
        return target_class(**data)
