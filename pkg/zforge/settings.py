import yaml
from pydantic import BaseModel, Field


class ForcingSettings(BaseModel):
    exhaustive_limit: int = Field(20, ge=0)


class AnalysisSettings(BaseModel):
    sweep_limit: int = Field(16, ge=0)


class GadgetSettings(BaseModel):
    search_vertex_limit: int = Field(6, ge=1)
    stub_length: int = Field(2, ge=1)
    sink_length: int = Field(1, ge=1)


class CompilerSettings(BaseModel):
    balance_delays: bool = True
    insert_filters: bool = False
    net_delay: int = Field(0, ge=0)


class Settings(BaseModel):
    forcing: ForcingSettings = ForcingSettings()
    analysis: AnalysisSettings = AnalysisSettings()
    gadgets: GadgetSettings = GadgetSettings()
    compiler: CompilerSettings = CompilerSettings()


def load_settings(path) -> Settings:
    """Read the YAML settings file; missing sections fall back to their defaults."""
    with open(path, "r") as f:
        data = yaml.safe_load(f) or {}

    return Settings.model_validate(data)
