# Delay model: asynchronous relay delay profiles and rank certification
