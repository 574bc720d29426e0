"""
Protobuf text documents for frozen dataclasses.

The message schema is generated from the dataclass fields at runtime, so a
dataclass is the only definition of its document layout:

    float -> double, int -> int64, bool -> bool, str -> string,
    Tuple[float, ...] / Tuple[int, ...] -> repeated scalar,
    nested dataclass -> message, Tuple[dataclass, ...] -> repeated message.

Fields absent from a document keep their dataclass defaults, so an empty
repeated field also means "default". Unknown keys are errors.
"""

import dataclasses
import typing

from google.protobuf import descriptor_pb2, descriptor_pool, message_factory, text_format

from ..errors import ConfigError

PACKAGE = "platonav"

_SCALARS = {
    float: descriptor_pb2.FieldDescriptorProto.TYPE_DOUBLE,
    int: descriptor_pb2.FieldDescriptorProto.TYPE_INT64,
    bool: descriptor_pb2.FieldDescriptorProto.TYPE_BOOL,
    str: descriptor_pb2.FieldDescriptorProto.TYPE_STRING,
}


def _field_kind(annotation):
    """(element type, repeated) for a supported annotation"""
    if typing.get_origin(annotation) in (tuple, typing.Tuple):
        args = typing.get_args(annotation)
        if len(args) != 2 or args[1] is not Ellipsis:
            raise TypeError(f"only homogeneous Tuple[X, ...] fields are supported, got {annotation}")
        return args[0], True
    return annotation, False


def _message_class(pool, full_name):
    descriptor = pool.FindMessageTypeByName(full_name)
    if hasattr(message_factory, "GetMessageClass"):
        return message_factory.GetMessageClass(descriptor)
    return message_factory.MessageFactory(pool).GetPrototype(descriptor)


class DataclassDocument:
    """
    Text-format codec for one root dataclass and the dataclasses it nests.

    Args:
        root: Frozen dataclass type at the top of the document
    """

    def __init__(self, root):
        self.root = root
        self._hints = {}
        file_proto = descriptor_pb2.FileDescriptorProto(
            name=f"{PACKAGE}/{root.__name__.lower()}.proto", package=PACKAGE, syntax="proto2",
        )
        self._declare(root, file_proto, set())
        pool = descriptor_pool.DescriptorPool()
        pool.AddSerializedFile(file_proto.SerializeToString())
        self._classes = {cls: _message_class(pool, f"{PACKAGE}.{cls.__name__}") for cls in self._hints}

    def _declare(self, cls, file_proto, seen):
        if cls in seen:
            return
        seen.add(cls)
        hints = typing.get_type_hints(cls)
        self._hints[cls] = hints
        message = file_proto.message_type.add(name=cls.__name__)
        for number, field in enumerate(dataclasses.fields(cls), start=1):
            element, repeated = _field_kind(hints[field.name])
            proto_field = message.field.add(
                name=field.name, number=number,
                label=(descriptor_pb2.FieldDescriptorProto.LABEL_REPEATED if repeated
                       else descriptor_pb2.FieldDescriptorProto.LABEL_OPTIONAL),
            )
            if dataclasses.is_dataclass(element):
                proto_field.type = descriptor_pb2.FieldDescriptorProto.TYPE_MESSAGE
                proto_field.type_name = f".{PACKAGE}.{element.__name__}"
                self._declare(element, file_proto, seen)
            elif element in _SCALARS:
                proto_field.type = _SCALARS[element]
            else:
                raise TypeError(f"unsupported field type {element} for {cls.__name__}.{field.name}")

    def to_message(self, instance, path=""):
        cls = type(instance)
        message = self._classes[cls]()
        for field in dataclasses.fields(cls):
            element, repeated = _field_kind(self._hints[cls][field.name])
            value = getattr(instance, field.name)
            name = f"{path}{field.name}"
            if repeated:
                default = _default(field)
                if len(value) == 0 and default is not None and len(default) > 0:
                    raise ConfigError("an empty list cannot be written where the default is non-empty",
                                      field=name)
                target = getattr(message, field.name)
                for item in value:
                    if dataclasses.is_dataclass(element):
                        target.add().CopyFrom(self.to_message(item, f"{name}."))
                    else:
                        target.append(element(item))
            elif dataclasses.is_dataclass(element):
                getattr(message, field.name).CopyFrom(self.to_message(value, f"{name}."))
            else:
                setattr(message, field.name, element(value))
        return message

    def from_message(self, message, cls=None, path=""):
        cls = cls or self.root
        values = {}
        for field in dataclasses.fields(cls):
            element, repeated = _field_kind(self._hints[cls][field.name])
            name = f"{path}{field.name}"
            if repeated:
                items = getattr(message, field.name)
                if len(items) == 0:
                    continue
                if dataclasses.is_dataclass(element):
                    values[field.name] = tuple(self.from_message(item, element, f"{name}.") for item in items)
                else:
                    values[field.name] = tuple(element(item) for item in items)
            elif message.HasField(field.name):
                raw = getattr(message, field.name)
                values[field.name] = (self.from_message(raw, element, f"{name}.")
                                      if dataclasses.is_dataclass(element) else element(raw))
        try:
            return cls(**values)
        except ConfigError:
            raise
        except (TypeError, ValueError) as e:
            raise ConfigError(str(e), field=path.rstrip(".") or None) from e

    def dumps(self, instance):
        return text_format.MessageToString(
            self.to_message(instance), use_short_repeated_primitives=True,
        )

    def loads(self, text):
        message = self._classes[self.root]()
        try:
            text_format.Parse(text, message)
        except text_format.ParseError as e:
            line = e.GetLine() if hasattr(e, "GetLine") else None
            raise ConfigError(str(e), line=line) from e
        return self.from_message(message)


def _default(field):
    if field.default is not dataclasses.MISSING:
        return field.default
    if field.default_factory is not dataclasses.MISSING:
        return field.default_factory()
    return None
