from pydantic import BaseModel, ConfigDict


class BaseSchema(BaseModel):
    """Base schema for all toolkit models with common configuration"""
    model_config = ConfigDict(
        frozen=True,
        populate_by_name=True,
        ser_json_inf_nan="strings",
    )


class Point(BaseSchema):
    """A point of the complex plane, serialized as {re, im}"""
    re: float
    im: float

    @property
    def z(self) -> complex:
        return complex(self.re, self.im)

    @classmethod
    def of(cls, z: complex) -> "Point":
        z = complex(z)
        return cls(re=z.real, im=z.imag)
