# Allows "from config.settings import *" patterns if needed.
