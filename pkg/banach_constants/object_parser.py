import json

from banach_constants.exceptions import SpecParseError, SpecValidationError
from banach_constants.models.abstract_record import AbstractRecord
from banach_constants.models.models import SpaceSpec


class SpaceSpecParser(object):
    """
    Parses space-spec documents (JSON, UTF-8) into validated SpaceSpec
    records. Unknown keys are rejected.
    """

    SHORTHAND_PREFIX = "lp:"

    @staticmethod
    def load(text):
        if isinstance(text, bytes):
            text = text.decode("utf-8")
        try:
            return json.loads(text)
        except json.JSONDecodeError as e:
            raise SpecParseError(e.msg, line=e.lineno, column=e.colno) from None

    @staticmethod
    def parse_single(response, target_class=SpaceSpec):
        if isinstance(response, (str, bytes)):
            response = SpaceSpecParser.load(response)
        if not isinstance(response, dict):
            raise SpecParseError("space spec must be a JSON object")

        allowed = target_class.field_names()
        for key in response.keys():
            if key not in allowed:
                raise SpecValidationError("unknown key %r" % key, key)
        return AbstractRecord.create_object(response, target_class)

    @staticmethod
    def parse_multiple(response, target_class=SpaceSpec):
        """
        Parses a corpus document: either a list of spec objects or an object
        with a "spaces" list.
        """
        if isinstance(response, (str, bytes)):
            response = SpaceSpecParser.load(response)
        if isinstance(response, dict):
            if set(response.keys()) != {"spaces"}:
                raise SpecParseError('corpus object must hold exactly one key, "spaces"')
            response = response["spaces"]
        if not isinstance(response, list):
            raise SpecParseError("corpus must be a list of space specs")
        return [
            SpaceSpecParser.parse_single(json_obj, target_class) for json_obj in response
        ]

    @staticmethod
    def parse_shorthand(token):
        """
        Parses the compact form lp:<p>:<dim>, e.g. lp:1:2 or lp:inf:3.
        """
        if not token.startswith(SpaceSpecParser.SHORTHAND_PREFIX):
            raise SpecParseError("shorthand must look like lp:<p>:<dim>", line=1, column=1)
        parts = token.split(":")
        if len(parts) != 3:
            raise SpecParseError("shorthand must look like lp:<p>:<dim>", line=1, column=1)
        p_text, dim_text = parts[1], parts[2]
        try:
            p = "inf" if p_text.strip().lower() in ("inf", "infinity") else float(p_text)
        except ValueError:
            raise SpecParseError("p is not a number", line=1, column=4) from None
        try:
            dim = int(dim_text)
        except ValueError:
            raise SpecParseError(
                "dim is not an integer", line=1, column=len(parts[0]) + len(p_text) + 3
            ) from None
        return SpaceSpec(family="lp", p=p, dim=dim)
