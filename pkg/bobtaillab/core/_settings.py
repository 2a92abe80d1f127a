import logging
from pathlib import Path
from typing import Any, get_args, get_origin

from pydantic import BaseModel, Field, SecretStr, field_validator
from pydantic.fields import FieldInfo
from pydantic_settings import (
    BaseSettings,
    EnvSettingsSource,
    PydanticBaseSettingsSource,
    SettingsConfigDict,
)

_LIST_ITEM_TYPES: dict[type, type] = {str: str, int: int, float: float}


def _parse_list(value: str | None, item_type: type = str) -> list[Any]:
    if not value:
        return []
    return [item_type(str(x).strip()) for x in value.split(",") if str(x).strip()]


class _EnvSource(EnvSettingsSource):
    def prepare_field_value(
        self,
        field_name: str,
        field: FieldInfo,
        value: Any,
        value_is_complex: bool
    ) -> Any:
        # Only apply CSV parsing to flat list fields (list[int] / list[str] / list[float])
        if get_origin(field.annotation) is list and isinstance(value, str):
            args = get_args(field.annotation)
            if args and args[0] in _LIST_ITEM_TYPES:
                try:
                    return _parse_list(value, _LIST_ITEM_TYPES[args[0]])
                except ValueError as e:
                    logging.warning(f"Failed to parse list for field '{field_name}' from env variable: {e}")
                    return None
        return super().prepare_field_value(field_name, field, value, value_is_complex)


class Settings(BaseSettings):
    model_config = SettingsConfigDict(env_prefix="BOBTAIL_")

    project_root: Path = Path(__file__).parent.parent.parent.resolve()
    output_dir: Path = Path("results")

    # Protocol hashes are exact integers of this width; simulations use a
    # normalized real-valued space of 2^sim_hash_bits.
    hash_bits: int = Field(default=256, ge=8, le=256)
    sim_hash_bits: int = Field(default=64, ge=8, le=256)

    default_trials: int = Field(default=10_000, ge=1)
    min_reliable_trials: int = Field(default=1_000, ge=1)
    jobs: int = Field(default=1, ge=1)
    k_grid: list[int] = Field(default_factory=lambda: [1, 2, 5, 10, 20, 40])
    broadcast_probability: float = Field(default=0.999999, gt=0.0, lt=1.0)
    quantile_max_iterations: int = Field(default=200, ge=10)

    log_level: str = "INFO"
    log_file: Path | None = None

    signing_salt: SecretStr = SecretStr("bobtail-stub-signature-salt")

    @field_validator("k_grid")
    @classmethod
    def validate_k_grid(cls, v: list[int]) -> list[int]:
        if not v or any(k < 1 for k in v):
            raise ValueError("k_grid must be a non-empty list of positive integers")
        return v

    @field_validator("log_file", mode="before")
    @classmethod
    def normalize_empty_to_none(cls, v: Any) -> Any:
        """An empty BOBTAIL_LOG_FILE disables file logging."""
        if v == "":
            return None
        return v

    @property
    def hash_space(self) -> int:
        return (1 << self.hash_bits) - 1

    @property
    def sim_hash_space(self) -> float:
        return float(1 << self.sim_hash_bits)

    @classmethod
    def settings_customise_sources(
        cls,
        settings_cls: type[BaseSettings],
        init_settings: PydanticBaseSettingsSource,
        env_settings: PydanticBaseSettingsSource,
        dotenv_settings: PydanticBaseSettingsSource,
        file_secret_settings: PydanticBaseSettingsSource,

    ) -> tuple[PydanticBaseSettingsSource, ...]:
        return (init_settings, _EnvSource(settings_cls), )

    def resolve_output(self, path: Path | str | None, /, *, default_name: str) -> Path:
        if path is None:
            return self.output_dir / default_name
        path = Path(path)
        if path.is_absolute() or path.parent != Path("."):
            return path
        return self.output_dir / path


settings = Settings()


class FeatureFlags(BaseModel):
    trace_events: bool = False
    orphan_prevention_rules: bool = True
    warn_small_trials: bool = True
    reuse_first_block_proofs: bool = False


feature_flags = FeatureFlags()
