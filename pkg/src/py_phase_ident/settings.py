"""Environment settings shared by the library and the CLI"""

from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    log_level: str = "INFO"
    log_to_file: bool = False
    log_dir: str = "logs"
    float_digits: int = 12

    model_config = SettingsConfigDict(
        env_file=".env", env_prefix="PHASE_ID_", extra="ignore"
    )


settings = Settings()
