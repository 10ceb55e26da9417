# Tools module: command-line front end
