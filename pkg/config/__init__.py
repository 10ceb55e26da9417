# Config module
from .config import *
