"""HTTP service wrapping the analysis library.

The CLI calls the same handler functions in process; running ``uvicorn
reluscope.service.app:app`` (or ``reluscope serve``) exposes them over HTTP
for multi-client use.
"""
