"""FastAPI uygulaması."""
import logging

from fastapi import FastAPI

from app import __version__
from app.config import LOG_FORMAT, LOG_LEVEL
from app.routers import circuits

logging.basicConfig(level=LOG_LEVEL, format=LOG_FORMAT)
logger = logging.getLogger(__name__)

app = FastAPI(
    title="RevCheck",
    description="Tersinir devrelerde rastgele uyarilarla hata tespiti",
    version=__version__,
)
app.include_router(circuits.router)


@app.get("/health")
async def health():
    return {"status": "ok"}
